// VERDICT: SUCCESSFUL
void f() noexcept {
  try { throw 1; }
  catch (int e) { }
}
int main() {
  f();
  return 0;
}
