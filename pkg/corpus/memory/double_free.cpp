// VERDICT: FAILED
// PROPERTY: invalid object in delete
int main() {
  int *p = new int(1);
  delete p;
  delete p;
  return 0;
}
