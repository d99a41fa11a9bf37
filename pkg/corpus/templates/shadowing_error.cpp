// VERDICT: ERROR
template <int N> struct X
{
  template <int N>
  friend int foo(X const &)
  {
    return N;
  }
};
int main() { return 0; }
