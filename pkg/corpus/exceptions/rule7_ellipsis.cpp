// VERDICT: SUCCESSFUL
int main() {
  try { throw 'x'; }
  catch (...) { return 0; }
  return 1;
}
