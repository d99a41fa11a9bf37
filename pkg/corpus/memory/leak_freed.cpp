// VERDICT: SUCCESSFUL
// FLAGS: --memory-leak-check
int main() {
  int *p = new int(1);
  delete p;
  return 0;
}
