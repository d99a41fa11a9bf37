// VERDICT: SUCCESSFUL
int main() {
  int caught = 0;
  for (int i = 0; i < 3; i++) {
    try {
      if (i == 1) { throw i; }
    } catch (int e) {
      caught = caught + e;
    }
  }
  assert(caught == 1);
  return 0;
}
