// VERDICT: SUCCESSFUL
int main() {
  int big = 2147483647;
  assert(big + 1 < 0);
  char wrapped = 200 + 100;
  assert(wrapped == 44);
  return 0;
}
