// VERDICT: FAILED
// PROPERTY: throw specification violation
void f() noexcept { throw 1; }
int main() {
  f();
  return 0;
}
