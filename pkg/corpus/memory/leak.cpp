// VERDICT: FAILED
// PROPERTY: memory leak
// FLAGS: --memory-leak-check
int main() {
  int *p = new int(1);
  return 0;
}
