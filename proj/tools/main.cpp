#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "common.hpp"
#include "mtkit/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Corpus-side toolkit for targeted MT data augmentation and evaluation"};
  app.require_subcommand(1);

  mtkit::tools::register_corpus_commands(app);
  mtkit::tools::register_tda_commands(app);
  mtkit::tools::register_bt_commands(app);
  mtkit::tools::register_idiom_commands(app);
  mtkit::tools::register_vol_commands(app);
  mtkit::tools::register_emb_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  } catch (const mtkit::FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mtkit::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
