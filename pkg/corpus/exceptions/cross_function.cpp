// VERDICT: SUCCESSFUL
void inner() { throw 42; }
int main() {
  try { inner(); }
  catch (int e) {
    assert(e == 42);
    return 0;
  }
  return 1;
}
