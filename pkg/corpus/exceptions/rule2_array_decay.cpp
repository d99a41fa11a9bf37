// VERDICT: SUCCESSFUL
int main() {
  int arr[3];
  try { throw arr; }
  catch (int *p) { return 0; }
  return 1;
}
