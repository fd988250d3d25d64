#include <stdio.h>
#include <string.h>

int main(int argc, char **argv) {
    printf("done\n");
    if (argc > 1 && strcmp(argv[1], "fail") == 0) {
        return 3;
    }
    return 0;
}
