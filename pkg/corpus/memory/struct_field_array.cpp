// VERDICT: SUCCESSFUL
struct Buf {
  int data[4];
};
int main() {
  Buf b;
  b.data[0] = 1;
  b.data[3] = 4;
  assert(b.data[0] + b.data[3] == 5);
  return 0;
}
