// VERDICT: SUCCESSFUL
int main() {
  try {
    try { throw 1; }
    catch (int e) { throw 'c'; }
  } catch (char c) {
    return 0;
  }
  return 1;
}
