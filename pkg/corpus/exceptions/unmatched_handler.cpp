// VERDICT: FAILED
// PROPERTY: uncaught exception
int main() {
  try { throw 'c'; }
  catch (int x) { return 0; }
  return 1;
}
