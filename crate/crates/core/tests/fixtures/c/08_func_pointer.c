#include <stdio.h>

static int square(int v) { return v * v; }
static int negate(int v) { return -v; }

int main(void)
{
    int (*ops[2])(int) = { square, negate };
    int (*chosen)(int);
    int input = 7;
    int out;

    chosen = ops[input % 2];
    out = chosen(input);
    printf("%d\n", out);
    return 0;
}
