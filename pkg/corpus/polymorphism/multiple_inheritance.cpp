// VERDICT: SUCCESSFUL
class A { public: virtual int fa() { return 1; } };
class B { public: virtual int fb() { return 2; } };
class C : public A, public B {
  public:
  int fa() override { return 10; }
  int fb() override { return 20; }
};
int main() {
  C *c = new C();
  A *a = c;
  B *b = c;
  assert(a->fa() == 10);
  assert(b->fb() == 20);
  delete c;
  return 0;
}
