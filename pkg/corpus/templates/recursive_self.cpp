// VERDICT: SUCCESSFUL
template <int N> struct R {
  R<N> *p;
  int tag;
};
int main() {
  R<7> r;
  r.tag = 7;
  assert(r.tag == 7);
  return 0;
}
