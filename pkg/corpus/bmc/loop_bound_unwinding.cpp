// VERDICT: FAILED
// PROPERTY: unwinding assertion
// FLAGS: --unwind 4 --unwinding-assertions
int main() {
  int i = 0;
  while (i < 10) {
    i = i + 1;
    assert(i != 5);
  }
  return 0;
}
