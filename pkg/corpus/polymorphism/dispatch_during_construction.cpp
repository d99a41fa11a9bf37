// VERDICT: SUCCESSFUL
int probe = 0;
class Bird {
  public:
  Bird() { probe = doit(); }
  virtual int doit() { return 21; }
};
class Penguin : public Bird {
  public:
  int doit() override { return 42; }
};
int main() {
  Penguin *p = new Penguin();
  assert(probe == 21);
  assert(p->doit() == 42);
  delete p;
  return 0;
}
