// VERDICT: SUCCESSFUL
struct Payload { int code; };
int main() {
  try {
    Payload p;
    p.code = 9;
    throw p;
  }
  catch (Payload got) {
    assert(got.code == 9);
    return 0;
  }
  return 1;
}
