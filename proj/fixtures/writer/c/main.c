#include <stdio.h>

int main(int argc, char **argv) {
    if (argc > 1) {
        FILE *f = fopen("out.txt", "wb");
        if (!f) return 1;
        fputs(argv[1], f);
        fclose(f);
    }
    return 0;
}
