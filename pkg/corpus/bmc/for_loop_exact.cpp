// VERDICT: SUCCESSFUL
// FLAGS: --unwind 2
int main() {
  for (int i = 0; i < 2; i++) {
    assert(i < 2);
  }
  return 0;
}
