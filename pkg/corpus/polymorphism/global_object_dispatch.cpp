// VERDICT: SUCCESSFUL
class Bird { public: virtual int doit() { return 21; } };
class Penguin : public Bird { public: int doit() override { return 42; } };
Penguin pet;
int main() {
  assert(pet.doit() == 42);
  Bird *p = &pet;
  assert(p->doit() == 42);
  return 0;
}
