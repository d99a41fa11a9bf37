// VERDICT: SUCCESSFUL
// FLAGS: --unwind 3
int main() {
  int total = 0;
  for (int i = 0; i < 2; i++) {
    for (int j = 0; j < 2; j++) {
      total = total + 1;
    }
  }
  assert(total == 4);
  return 0;
}
