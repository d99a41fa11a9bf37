// VERDICT: SUCCESSFUL
int main() {
  try {
    try { throw 5; }
    catch (int e) { throw; }
  }
  catch (int f) {
    assert(f == 5);
    return 0;
  }
  return 1;
}
