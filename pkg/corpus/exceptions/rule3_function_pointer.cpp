// VERDICT: SUCCESSFUL
int callee() { return 1; }
int main() {
  try { throw callee; }
  catch (int (*f)()) { return 0; }
  return 1;
}
