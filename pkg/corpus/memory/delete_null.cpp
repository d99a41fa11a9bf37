// VERDICT: SUCCESSFUL
int main() {
  int *p = nullptr;
  delete p;
  return 0;
}
