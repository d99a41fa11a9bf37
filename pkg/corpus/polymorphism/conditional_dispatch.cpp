// VERDICT: SUCCESSFUL
class Bird { public: virtual int doit() { return 21; } };
class Penguin : public Bird { public: int doit() override { return 42; } };
int main() {
  int c;
  Bird *p;
  if (c > 0) { p = new Penguin(); } else { p = new Bird(); }
  int r = p->doit();
  if (c > 0) { assert(r == 42); } else { assert(r == 21); }
  delete p;
  return 0;
}
