// VERDICT: FAILED
// PROPERTY: dereference failure: invalidated dynamic object
class Foo {
  public:
    Foo() {value = 0;};
    void Inc() {value++;};
  private:
    int value;
};

int main() {
  Foo *foo = new Foo();
  delete foo;
  foo->Inc();
  return 0;
}
