// VERDICT: FAILED
// PROPERTY: throw specification violation
void f() throw(int, double) { throw 'c'; }
int main() {
  f();
  return 0;
}
