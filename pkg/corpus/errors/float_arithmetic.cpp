// VERDICT: ERROR
int main() {
  double d;
  double e;
  int x = d + e;
  return 0;
}
