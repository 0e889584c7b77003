#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "fairexpo/textio.hpp"

namespace fairexpo::testsupport {

// Twelve callers in two taste groups. Both groups hear the same catalog;
// group A likes aspect-a items, skips aspect-b items, and likes the news
// topic, group B does the reverse. The news split separates the groups'
// preference vectors, the aspect split gives every cluster both label
// classes over the training topic.
inline std::string fixture_log() {
  const std::int64_t base = 1684108800;  // 2023-05-15T00:00:00
  const int sa_rating[6] = {5, 4, 3, 5, 4, 3};
  const int sb_rating[6] = {4, 3, 2, 4, 3, 2};
  const int na_rating[3] = {3, 4, 5};

  std::string out =
      "call_id,caller_id,item_id,contributor_id,item_duration,duration_heard,"
      "source,topic,aspect,rating,key_pressed,timestamp,rank_position\n";
  char row[256];
  for (int ui = 0; ui < 12; ++ui) {
    const bool group_a = ui < 6;
    char caller[8];
    std::snprintf(caller, sizeof(caller), "u%02d", ui + 1);
    for (int k = 0; k < 10; ++k) {
      const std::int64_t ts = base + static_cast<std::int64_t>(k) * 7 * 3600 + ui * 60;
      char call[24];
      std::snprintf(call, sizeof(call), "c_%s_%d", caller, k);
      const int ai = (k + ui) % 6;
      const int bi = (k + 2 * ui) % 6;
      const int ni = k % 3;

      // Skips stay under the heard threshold so the key decides the label.
      std::snprintf(row, sizeof(row), "%s,%s,sa%d,u01,120,%d,User,stories,a,%d,%s,%lld,1\n",
                    call, caller, ai + 1, group_a ? 90 : 30, sa_rating[ai],
                    group_a ? "Like" : "Skip", static_cast<long long>(ts));
      out += row;
      std::snprintf(row, sizeof(row), "%s,%s,sb%d,u07,120,%d,User,stories,b,%d,%s,%lld,2\n",
                    call, caller, bi + 1, group_a ? 30 : 90, sb_rating[bi],
                    group_a ? "Skip" : "Like", static_cast<long long>(ts));
      out += row;
      std::snprintf(row, sizeof(row), "%s,%s,na%d,u02,120,%d,User,news,world,%d,%s,%lld,3\n",
                    call, caller, ni + 1, group_a ? 90 : 30, na_rating[ni],
                    group_a ? "Like" : "Skip", static_cast<long long>(ts));
      out += row;
    }
  }
  return out;
}

inline std::string fixture_items() {
  std::string out = "item_id,topic,aspects,rating,contributor_id,created_at\n";
  const int sa_rating[6] = {5, 4, 3, 5, 4, 3};
  const int sb_rating[6] = {4, 3, 2, 4, 3, 2};
  const int na_rating[3] = {3, 4, 5};
  char row[128];
  for (int i = 0; i < 6; ++i) {
    std::snprintf(row, sizeof(row), "sa%d,stories,a,%d,u01,2023-05-14T00:00:00\n", i + 1,
                  sa_rating[i]);
    out += row;
    std::snprintf(row, sizeof(row), "sb%d,stories,b,%d,u07,2023-05-14T00:00:00\n", i + 1,
                  sb_rating[i]);
    out += row;
  }
  for (int i = 0; i < 3; ++i) {
    std::snprintf(row, sizeof(row), "na%d,news,world,%d,u02,2023-05-14T00:00:00\n", i + 1,
                  na_rating[i]);
    out += row;
  }
  return out;
}

struct Fixture {
  std::string root;
  std::string config_path;
  std::string out_dir;
};

inline Fixture make_fixture(const std::string& tag) {
  Fixture fixture;
  fixture.root = (std::filesystem::temp_directory_path() / ("fairexpo_" + tag)).string();
  std::filesystem::remove_all(fixture.root);
  std::filesystem::create_directories(fixture.root);
  fixture.out_dir = fixture.root + "/out";
  fixture.config_path = fixture.root + "/run.ini";

  write_file(fixture.root + "/calls.csv", fixture_log());
  write_file(fixture.root + "/items.csv", fixture_items());
  write_file(fixture.config_path,
             "[run]\n"
             "id = e2e\n"
             "topic = stories\n"
             "\n"
             "[paths]\n"
             "logs = " + fixture.root + "/calls.csv\n"
             "items = " + fixture.root + "/items.csv\n"
             "output_dir = " + fixture.out_dir + "\n"
             "\n"
             "[filter]\n"
             "divergence_keep_fraction = 1.0\n"
             "\n"
             "[clustering]\n"
             "k = 2\n"
             "seed = 3\n"
             "\n"
             "[classifier]\n"
             "num_trees = 30\n"
             "max_depth = 4\n"
             "seed = 5\n"
             "\n"
             "[schedule]\n"
             "horizon_hours = 72\n"
             "list_length = 4\n"
             "\n"
             "[simulation]\n"
             "master_seed = 11\n");
  return fixture;
}

// Runs the pipeline binary and returns its exit code, or a negative value
// when the process could not be launched.
inline int cli_exit(const std::string& cli_path, const std::string& tail) {
  const std::string command = "\"" + cli_path + "\" " + tail + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

}  // namespace fairexpo::testsupport
