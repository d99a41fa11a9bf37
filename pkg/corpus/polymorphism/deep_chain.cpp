// VERDICT: SUCCESSFUL
class A { public: virtual int f() { return 1; } };
class B : public A { public: virtual int g() { return 2; } };
class C : public B {
  public:
  int f() override { return 3; }
  int g() override { return 4; }
};
int main() {
  A *a = new C();
  B *b = new C();
  assert(a->f() == 3);
  assert(b->g() == 4);
  delete a;
  delete b;
  return 0;
}
