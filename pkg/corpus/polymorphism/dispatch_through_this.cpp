// VERDICT: SUCCESSFUL
class Bird {
  public:
  virtual int doit() { return 21; }
  int call_doit() { return doit(); }
};
class Penguin : public Bird {
  public:
  int doit() override { return 42; }
};
int main() {
  Penguin *p = new Penguin();
  Bird *b = p;
  assert(b->call_doit() == 42);
  Bird plain;
  assert(plain.call_doit() == 21);
  delete p;
  return 0;
}
