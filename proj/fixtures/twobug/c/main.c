#include <ctype.h>
#include <stdio.h>
#include <string.h>

int main(int argc, char **argv) {
    int upper = argc > 1 && strcmp(argv[1], "-u") == 0;
    int n = 0;
    int c;
    while ((c = getchar()) != EOF) {
        n++;
        putchar(upper ? toupper(c) : c);
    }
    return n == 0 ? 1 : 0;
}
