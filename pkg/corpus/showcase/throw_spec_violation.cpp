// VERDICT: FAILED
// PROPERTY: throw specification violation
void func() throw(int, double);

void func() throw(int, double) {
  throw 'c';
}

int main() {
  func();
  return 0;
}
