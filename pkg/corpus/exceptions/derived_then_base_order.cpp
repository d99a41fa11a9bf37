// VERDICT: SUCCESSFUL
struct Base {};
struct Derived : Base {};
int main() {
  try { throw Derived(); }
  catch (Derived) { return 0; }
  catch (Base) { assert(0); }
  return 1;
}
