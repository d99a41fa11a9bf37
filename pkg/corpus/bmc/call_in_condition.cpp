// VERDICT: SUCCESSFUL
int counter = 0;
int bump() {
  counter = counter + 1;
  return counter;
}
int main() {
  while (bump() < 3) { }
  assert(counter == 3);
  return 0;
}
