// VERDICT: SUCCESSFUL
struct Base { int b; };
struct Derived : Base { int d; };
int main() {
  try {
    Derived x;
    x.b = 3;
    x.d = 4;
    throw x;
  } catch (Base got) {
    assert(got.b == 3);
    return 0;
  }
  return 1;
}
