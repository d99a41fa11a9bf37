// VERDICT: SUCCESSFUL
#include <cassert>
#include <utility>
struct MyStruct {
  int value;
};

int main() {
  MyStruct a{10};
  MyStruct b(std::move(a));
  assert(b.value == 10);
}
