// VERDICT: SUCCESSFUL
class Base { public: int v; };
class Derived : public Base { public: int v; };
int main() {
  Derived d;
  d.v = 5;
  Base *b = &d;
  b->v = 7;
  assert(d.v == 5);
  return 0;
}
