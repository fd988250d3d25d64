#include <stdio.h>
#include <string.h>

int main(int argc, char **argv) {
    if (argc > 1 && strcmp(argv[1], "spin") == 0) {
        printf("spun\n");
        return 0;
    }
    printf("idle\n");
    return 0;
}
