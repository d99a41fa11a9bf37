// VERDICT: SUCCESSFUL
#include <cassert>
struct Base {};
struct Derived : Base{};

int main() {
  try {
    throw Derived();
  }
  catch(Base) {}
  catch(Derived) {assert(0);}
  return 0;
}
