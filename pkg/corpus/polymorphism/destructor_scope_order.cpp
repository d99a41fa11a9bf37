// VERDICT: SUCCESSFUL
int observed = 0;
class Guard {
  public:
  Guard() { observed = 1; }
  ~Guard() { observed = 2; }
};
int check() {
  Guard g;
  assert(observed == 1);
  return 0;
}
int main() {
  check();
  assert(observed == 2);
  return 0;
}
