// VERDICT: SUCCESSFUL
int main() {
  try { throw 7; }
  catch (const int x) {
    assert(x == 7);
    return 0;
  }
  return 1;
}
