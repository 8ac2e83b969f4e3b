#include <stdio.h>
#include <string.h>

#include "altdiam.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  /* The 2x2 flip (a,b) -> (b,a). */
  size_t table[4] = {0, 2, 1, 3};
  AltdiamPermutation *p = NULL;
  CHECK(altdiam_permutation_from_table(2, 2, table, 4, &p) == ALTDIAM_STATUS_OK);

  AltdiamDecomposition *d = NULL;
  CHECK(altdiam_decompose(p, ALTDIAM_ORDER_RLR, &d) == ALTDIAM_STATUS_OK);
  CHECK(altdiam_decomposition_stage_count(d) == 3);

  bool ok = false;
  CHECK(altdiam_verify(d, p, &ok) == ALTDIAM_STATUS_OK);
  CHECK(ok);

  char *json = NULL;
  CHECK(altdiam_decomposition_to_json(d, &json) == ALTDIAM_STATUS_OK);
  CHECK(strstr(json, "\"order\":\"RLR\"") != NULL);
  altdiam_string_free(json);

  size_t bad[4] = {0, 0, 1, 3};
  AltdiamPermutation *q = NULL;
  CHECK(altdiam_permutation_from_table(2, 2, bad, 4, &q) == ALTDIAM_STATUS_INVALID_PERMUTATION);
  CHECK(q == NULL);
  CHECK(altdiam_last_error() != NULL);

  uint64_t swap[4] = {0, 1, 1, 0};
  AltdiamMatrix *m = NULL;
  CHECK(altdiam_matrix_new(2, 2, 2, swap, &m) == ALTDIAM_STATUS_OK);
  AltdiamLinearDecomposition *ld = NULL;
  CHECK(altdiam_decompose_linear(m, 1, 1, ALTDIAM_ORDER_LRL, &ld) == ALTDIAM_STATUS_OK);
  CHECK(altdiam_linear_verify(ld, m, &ok) == ALTDIAM_STATUS_OK);
  CHECK(ok);

  altdiam_linear_decomposition_free(ld);
  altdiam_matrix_free(m);
  altdiam_decomposition_free(d);
  altdiam_permutation_free(p);
  puts("ok");
  return 0;
}
