/*
 * Line-oriented driver around the vendored reference implementation.
 *
 * Reads commands on stdin, one per line, all numbers as bare hex:
 *
 *   C x                      -> compress(x)
 *   A x a                    -> avalanche(x, a)
 *   U y a                    -> unavalanche(y, a)
 *   N s1 s2 s3 s4 s5         -> y s1' s2' s3' s4' s5'   (one next() step)
 *   K n k1..kn               -> sk1..sk16
 *   E n k1..kn p1..p4        -> sk1..sk16 c1..c4 d1..d4 (d = decrypt(c))
 *   R r sk1..sk16 p1..p4     -> first r rounds of _encrypt, no whitening
 *
 * Output is one line per command, lowercase hex words separated by spaces.
 * Run with the single argument `reference-main` to execute the original
 * program's main() unchanged.
 */
#define main xcrush_reference_main
#include "xcrush_ref.c"
#undef main

#include <string.h>

static int read_words(unsigned long long *out, int n) {
    for (int i = 0; i < n; i++) {
        if (scanf("%llx", &out[i]) != 1) {
            return 0;
        }
    }
    return 1;
}

static void print_words(const unsigned long long *w, int n, int last) {
    for (int i = 0; i < n; i++) {
        printf("%016llx", w[i]);
        if (i + 1 < n || !last) {
            printf(" ");
        }
    }
    if (last) {
        printf("\n");
    }
}

static void rounds_only(unsigned long long block[4], int rounds,
        const unsigned long long sk[16]) {
    unsigned long long a = block[0], b = block[1], c = block[2], d = block[3];
    for (int r = 0; r < rounds; r++) {
        const unsigned long long *k = sk + 4 * r;
        a = avalanche(a, b + c + d + k[0]);
        b = avalanche(b, a + c + d + k[1]);
        c = avalanche(c, a + b + d + k[2]);
        d = avalanche(d, a + b + c + k[3]);
    }
    block[0] = a;
    block[1] = b;
    block[2] = c;
    block[3] = d;
}

int main(int argc, const char *argv[]) {
    if (argc == 2 && strcmp(argv[1], "reference-main") == 0) {
        return xcrush_reference_main(argc, argv);
    }

    char cmd[8];
    while (scanf("%7s", cmd) == 1) {
        unsigned long long w[32];
        unsigned long long sk[NUM_SUBKEYS];
        int n;

        switch (cmd[0]) {
        case 'C':
            if (!read_words(w, 1)) return 2;
            printf("%x\n", compress(w[0]));
            break;
        case 'A':
            if (!read_words(w, 2)) return 2;
            printf("%016llx\n", (unsigned long long) avalanche(w[0], w[1]));
            break;
        case 'U':
            if (!read_words(w, 2)) return 2;
            printf("%016llx\n", (unsigned long long) unavalanche(w[0], w[1]));
            break;
        case 'N': {
            if (!read_words(w, 5)) return 2;
            S_1 = w[0]; S_2 = w[1]; S_3 = w[2]; S_4 = w[3]; S_5 = w[4];
            unsigned long long out[6];
            out[0] = (unsigned long long) next();
            out[1] = S_1; out[2] = S_2; out[3] = S_3; out[4] = S_4; out[5] = S_5;
            print_words(out, 6, 1);
            break;
        }
        case 'K':
            if (scanf("%d", &n) != 1 || n < 2 || n > 4) return 2;
            if (!read_words(w, n)) return 2;
            expand_key(w, n, sk);
            print_words(sk, NUM_SUBKEYS, 1);
            break;
        case 'E': {
            if (scanf("%d", &n) != 1 || n < 2 || n > 4) return 2;
            if (!read_words(w, n + 4)) return 2;
            unsigned long long block[4];
            memcpy(block, w + n, sizeof block);
            expand_key(w, n, sk);
            _encrypt(block, 0, 4, sk);
            print_words(sk, NUM_SUBKEYS, 0);
            print_words(block, 4, 0);
            decrypt(block, 0, 4, sk);
            print_words(block, 4, 1);
            break;
        }
        case 'R': {
            if (scanf("%d", &n) != 1 || n < 0 || n > 3) return 2;
            if (!read_words(w, NUM_SUBKEYS + 4)) return 2;
            rounds_only(w + NUM_SUBKEYS, n, w);
            print_words(w + NUM_SUBKEYS, 4, 1);
            break;
        }
        default:
            return 2;
        }
        fflush(stdout);
    }
    return 0;
}
