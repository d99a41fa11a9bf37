// VERDICT: SUCCESSFUL
int main() {
  try {
    for (int i = 0; i < 5; i++) {
      if (i == 2) { throw i; }
    }
  } catch (int e) {
    assert(e == 2);
    return 0;
  }
  return 1;
}
