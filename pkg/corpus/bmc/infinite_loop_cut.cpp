// VERDICT: SUCCESSFUL
// FLAGS: --unwind 3
int main() {
  while (true) { }
  return 0;
}
