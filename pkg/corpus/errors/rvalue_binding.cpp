// VERDICT: ERROR
int main() {
  int a = 1;
  int &&r = a;
  return 0;
}
