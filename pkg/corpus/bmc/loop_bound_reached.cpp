// VERDICT: FAILED
// PROPERTY: assertion
// FLAGS: --unwind 5
int main() {
  int i = 0;
  while (i < 10) {
    i = i + 1;
    assert(i != 5);
  }
  return 0;
}
