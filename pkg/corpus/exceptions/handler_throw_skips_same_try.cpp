// VERDICT: FAILED
// PROPERTY: uncaught exception
int main() {
  try { throw 1; }
  catch (int e) { throw 2; }
  catch (...) { return 1; }
  return 1;
}
