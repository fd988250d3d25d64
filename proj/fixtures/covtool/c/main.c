#include <stdio.h>
#include <stdlib.h>

int main(int argc, char **argv) {
    int v = 0;
    if (argc > 1) {
        v = atoi(argv[1]);
    }
    if (v > 0) {
        printf("pos\n");
    } else {
        printf("nonpos\n");
    }
    return 0;
}
