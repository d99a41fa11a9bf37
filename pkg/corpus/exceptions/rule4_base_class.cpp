// VERDICT: SUCCESSFUL
struct Base {};
struct Mid : Base {};
struct Derived : Mid {};
int main() {
  try { throw Derived(); }
  catch (Base) { return 0; }
  return 1;
}
