#include <stdio.h>

int main(int argc, char **argv) {
    int start = 1;
    int newline = 1;
    if (argc > 1 && argv[1][0] == '-' && argv[1][1] == 'n' && argv[1][2] == '\0') {
        newline = 0;
        start = 2;
    }
    for (int i = start; i < argc; i++) {
        if (i > start) fputc(' ', stdout);
        fputs(argv[i], stdout);
    }
    if (newline) fputc('\n', stdout);
    return 0;
}
