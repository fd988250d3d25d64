#include <stdio.h>
#include <string.h>

int main(int argc, char **argv) {
    if (argc > 1 && strcmp(argv[1], "bad") == 0) {
        fprintf(stderr, "warning: bad input\n");
        return 0;
    }
    printf("ok\n");
    return 0;
}
