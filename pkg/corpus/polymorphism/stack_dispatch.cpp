// VERDICT: SUCCESSFUL
class Bird { public: virtual int doit() { return 21; } };
int main() {
  Bird b;
  assert(b.doit() == 21);
  return 0;
}
