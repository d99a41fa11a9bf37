// VERDICT: SUCCESSFUL
class A { public: int ax; virtual int fa() { return ax; } };
class B { public: int bx; virtual int fb() { return bx; } };
class C : public A, public B { public: int cx; };
int main() {
  C *c = new C();
  c->ax = 1;
  c->bx = 2;
  c->cx = 3;
  A *a = c;
  B *b = c;
  assert(a->fa() == 1);
  assert(b->fb() == 2);
  delete c;
  return 0;
}
