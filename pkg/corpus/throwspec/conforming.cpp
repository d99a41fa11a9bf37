// VERDICT: SUCCESSFUL
void f() throw(int) { throw 1; }
int main() {
  try { f(); }
  catch (int e) {
    assert(e == 1);
    return 0;
  }
  return 1;
}
